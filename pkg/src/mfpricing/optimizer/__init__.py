from mfpricing.optimizer.config import get_optimizer

__all__ = ["get_optimizer"]
