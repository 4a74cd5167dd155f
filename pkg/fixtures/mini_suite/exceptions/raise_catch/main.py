class AppError(Exception):
    pass


def boom():
    raise AppError("bad")


def main():
    try:
        boom()
    except AppError:
        return None


main()
