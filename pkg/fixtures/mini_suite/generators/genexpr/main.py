def emit():
    pass


def main():
    gen = (emit for _ in range(2))
    for f in gen:
        f()


main()
