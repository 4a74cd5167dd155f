class Plugin:
    def activate(self):
        return "on"


def main():
    p = Plugin()
    name = "acti" + "vate"
    getattr(p, name)()


main()
