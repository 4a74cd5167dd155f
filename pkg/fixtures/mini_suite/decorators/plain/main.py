def wrap(f):
    return f


@wrap
def task():
    pass


task()
