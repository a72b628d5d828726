class OptimizerHook:
    def on_start(self, name: str, total: int): ...

    def on_grid_point(self, index: int, total: int): ...

    def on_custom_step(self, message: str): ...


class CombinedOptimizerHook(OptimizerHook):
    def __init__(self, hooks: list[OptimizerHook] | None = None):
        self._hooks = []
        for hook in hooks or []:
            self.add_hook(hook)

    def add_hook(self, hook: OptimizerHook):
        self._hooks.append(hook)

    def on_start(self, name: str, total: int):
        for hook in self._hooks:
            hook.on_start(name, total)

    def on_grid_point(self, index: int, total: int):
        for hook in self._hooks:
            hook.on_grid_point(index, total)

    def on_custom_step(self, message: str):
        for hook in self._hooks:
            hook.on_custom_step(message)
