import inspect
import traceback
from dataclasses import dataclass
from importlib.metadata import entry_points
from typing import Any, Generic, List, Optional, TypeVar

from loguru import logger
from prefect.tasks import Task

from ._errors import ConfigError
from .builtins_.tasks import compare, explain, generate_data, train
from .federation import BUILTIN_SELECTORS, ClientSelector, SelectorProvider


PLUGIN_GROUP = "fedmatrix.plugin"

T = TypeVar("T")


@dataclass(kw_only=True, frozen=True)
class Registration(Generic[T]):
    """A named registration; ``kind`` is ``task`` or ``selector``."""
    kind: str
    name: str
    target: T


_plugin_modules: Optional[List[Any]] = None  # loaded once per process


def load_plugin_modules() -> List[Any]:
    global _plugin_modules

    if _plugin_modules is None:
        modules = []
        for ep in entry_points(group=PLUGIN_GROUP):
            try:
                modules.append(ep.load())
                logger.info(f"loaded fedmatrix plugin '{ep.name}'")
            except Exception:
                logger.warning(f"skipping fedmatrix plugin '{ep.name}', import failed:\n{traceback.format_exc()}")
        _plugin_modules = modules
    return _plugin_modules


class FedMatrix:
    """
    实验任务与客户端选择策略的注册中心

    内置任务：generate_data / train / compare / explain（prefect task）；
    内置选择策略：pbcs / random。插件模块通过 ``fedmatrix.plugin`` 入口点提供
    ``register_plugin(fm, **kwargs)`` 来注册更多内容。同名注册以最后一次为准。
    """

    def __init__(
        self,
        *,
        enable_builtins: Optional[bool] = None,
        enable_plugins: Optional[bool] = None,
        **kwargs,
    ):
        self._registrations: List[Registration] = []
        self._plugins_enabled = False

        # builtins default to on, plugins to off
        if enable_builtins is None or enable_builtins:
            self.enable_builtins(**kwargs)
        if enable_plugins:
            self.enable_plugins(**kwargs)

    # -*- registration

    def enable_builtins(self, **kwargs) -> None:
        for builtin in (generate_data, train, compare, explain):
            self.register_task(task_name=builtin.name, task=builtin)
        for name, selector in BUILTIN_SELECTORS.items():
            self.register_selector(selector_name=name, selector=selector)

    def enable_plugins(self, **kwargs) -> None:
        if self._plugins_enabled:
            logger.warning("plugins already enabled")
            return
        for module in load_plugin_modules():
            try:
                module.register_plugin(self, **kwargs)
            except Exception:
                logger.warning(f"plugin {module!r} failed to register:\n{traceback.format_exc()}")
        self._plugins_enabled = True

    def _register(self, kind: str, name: str, target: Any) -> None:
        if self._lookup(kind, name) is not None:
            logger.warning(f"{kind} '{name}' registered again, the new one takes precedence")
        self._registrations.append(Registration(kind=kind, name=name, target=target))

    def _lookup(self, kind: str, name: str) -> Optional[Registration]:
        for registration in reversed(self._registrations):
            if registration.kind == kind and registration.name == name:
                return registration
        return None

    def _require(self, kind: str, name: str) -> Any:
        registration = self._lookup(kind, name)
        if registration is None:
            raise ConfigError(f"no {kind} named '{name}' is registered")
        return registration.target

    def register_task(self, task_name: str, task: Task) -> None:
        self._register("task", task_name, task)

    def register_selector(self, selector_name: str, selector: ClientSelector) -> None:
        self._register("selector", selector_name, selector)

    def has_task(self, task_name: str) -> bool:
        return self._lookup("task", task_name) is not None

    def has_selector(self, selector_name: str) -> bool:
        return self._lookup("selector", selector_name) is not None

    def get_task(self, task_name: str) -> Task:
        return self._require("task", task_name)

    def get_selector(self, selector_name: str) -> ClientSelector:
        return self._require("selector", selector_name)

    # -*- execution

    def run_task(self, task_name: str, *args, **kwargs) -> Any:
        """按名字运行任务；任务签名里声明了 ``selector_provider`` 时自动注入"""
        task = self.get_task(task_name)
        if "selector_provider" in inspect.signature(task.fn).parameters:
            kwargs.setdefault("selector_provider", SelectorProvider(self))
        logger.debug(f"* running task {task_name}")
        return task.fn(*args, **kwargs)
