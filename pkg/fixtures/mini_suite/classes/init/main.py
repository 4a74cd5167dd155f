class Worker:
    def __init__(self, job):
        self.job = job

    def run(self):
        return self.job


def main():
    w = Worker("fix")
    w.run()


main()
