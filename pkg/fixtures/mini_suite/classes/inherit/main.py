class Base:
    def hello(self):
        return 1


class Child(Base):
    pass


def main():
    c = Child()
    c.hello()


main()
