def f():
    return "pkg"
