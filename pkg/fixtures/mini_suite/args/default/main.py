def fallback():
    pass


def run(f=fallback):
    f()


run()
