class Greeter:
    def greet(self):
        return "hi"


def main():
    g = Greeter()
    g.greet()


main()
