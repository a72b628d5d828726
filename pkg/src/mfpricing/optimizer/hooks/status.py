from typing import Callable

from mfpricing.optimizer.hooks.abstract import OptimizerHook


class SetStatusOptimizerHook(OptimizerHook):
    """Forwards progress of an optimizer to `callable(id, message)`, e.g. to
    update one row of a sweep's progress display.
    """

    def __init__(self, id: str, callable: Callable[[str, str], None], *, every: int = 50):
        self._callable = callable
        self._id = id
        self._every = every

    def _update(self, message: str):
        self._callable(self._id, message)  # type: ignore

    def on_start(self, name: str, total: int):
        self._update(f"Starting {name} search over {total} grid points")

    def on_grid_point(self, index: int, total: int):
        if (index + 1) % self._every == 0 or index + 1 == total:
            self._update(f"Grid point {index + 1}/{total}")

    def on_custom_step(self, message: str):
        self._update(message)
