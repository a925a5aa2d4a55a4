from __future__ import annotations

import logging
from threading import Lock
from typing import Callable, Generic, Tuple, TypeVar

TSender = TypeVar("TSender")
TEvent = TypeVar("TEvent")

Handler = Callable[[TSender, TEvent], None]


class Event(Generic[TSender, TEvent]):
    """
    Subscription side of a notification. Handlers are called as ``handler(sender, event_args)``.

    :Example:

    >>> with solver.on_iteration.register(trace_writer):
    >>>    solver.solve(problem)  # trace_writer is deregistered afterwards
    """
    def __init__(self, name: str):
        self.name = name
        self._lock = Lock()
        self._handlers: Tuple[Handler, ...] = ()

    def register(self, handler: Handler) -> EventSubscriptionContext[TSender, TEvent]:
        """
        Registers a handler, once. Usable directly or as a ``with`` block

        :param handler: The handler to register
        :return: a context block that deregisters the handler on exit
        """
        with self._lock:
            if handler not in self._handlers:
                self._handlers = self._handlers + (handler,)
        return EventSubscriptionContext(self, handler)

    def deregister(self, handler: Handler):
        with self._lock:
            self._handlers = tuple(h for h in self._handlers if h != handler)

    @property
    def handler_count(self) -> int:
        return len(self._handlers)

    def __repr__(self):
        return f"{self.__class__.__name__}({self.name!r}, handlers={self.handler_count})"


class EventSource(Event[TSender, TEvent]):
    """
    The owner's side of an :class:`Event`. Owners expose it typed as ``Event`` so callers cannot notify
    """
    def __init__(self, name: str, logger: logging.Logger = None):
        super(EventSource, self).__init__(name)
        self._logger = logger

    @property
    def has_handlers(self) -> bool:
        return bool(self._handlers)

    def notify(self, sender: TSender, event_args: TEvent = None):
        """
        Calls each handler registered at the time of the call. A raising handler is logged and skipped
        """
        for handler in self._handlers:
            try:
                handler(sender, event_args)
            except Exception:
                if self._logger:
                    self._logger.exception(f"Handler {handler!r} failed on '{self.name}' with {event_args!r}")


class EventSubscriptionContext(Generic[TSender, TEvent]):
    def __init__(self, event: Event[TSender, TEvent], handler: Handler):
        self._event = event
        self._handler = handler

    def __enter__(self):
        self._event.register(self._handler)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self._event.deregister(self._handler)
