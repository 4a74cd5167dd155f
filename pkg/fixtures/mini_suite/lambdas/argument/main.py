def use(fn):
    return fn()


use(lambda: 99)
