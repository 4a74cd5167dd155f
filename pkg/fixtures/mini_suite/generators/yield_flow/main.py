def worker():
    pass


def produce():
    yield worker


def main():
    for fn in produce():
        fn()


main()
