def setup():
    pass


class Root:
    def __init__(self):
        setup()


class Leaf(Root):
    def __init__(self):
        super().__init__()


def main():
    Leaf()


main()
