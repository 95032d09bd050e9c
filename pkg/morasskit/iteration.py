from typing import Any, Callable, Iterable, Iterator, TypeVar

from morasskit.errors import MorassKitError

T = TypeVar("T")


class UnorderedError(MorassKitError):
    pass


def ensure_increasing(
    iterable: Iterable[T],
    key: Callable[[T], Any] = lambda k: k,
    strict: bool = True,
    msg: str = "",
) -> Iterator[T]:
    """
    Yields the elements of iterable, raising UnorderedError as soon as one
    is smaller than (or, when strict, equal to) its predecessor.
    """
    iterator = iter(iterable)
    try:
        element = next(iterator)
    except StopIteration:
        return

    yield element
    previous = element
    previous_key = key(element)

    for element in iterator:
        element_key = key(element)
        if element_key < previous_key or (strict and element_key == previous_key):
            raise UnorderedError(
                (
                    "Element is not above its predecessor. {}\n"
                    "Previous: {}\n"
                    "Current:  {}"
                ).format(msg, previous, element)
            )

        yield element
        previous = element
        previous_key = element_key


def is_increasing(iterable: Iterable[Any], strict: bool = True) -> bool:
    try:
        for _ in ensure_increasing(iterable, strict=strict):
            pass
    except UnorderedError:
        return False

    return True
