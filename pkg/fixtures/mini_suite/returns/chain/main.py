def make():
    def inner():
        return 42
    return inner


def main():
    f = make()
    f()


main()
