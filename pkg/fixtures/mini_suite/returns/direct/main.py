def provide():
    return helper


def helper():
    pass


provide()()
