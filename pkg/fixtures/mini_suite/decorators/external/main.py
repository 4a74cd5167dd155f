import functools


def plain():
    pass


@functools.lru_cache
def cached():
    return plain()


cached()
