def callee():
    pass


def caller(fn):
    fn()


def main():
    caller(callee)


main()
