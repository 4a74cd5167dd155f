def kfun():
    pass


def run(a=None, b=None):
    b()


def main():
    run(b=kfun)


main()
