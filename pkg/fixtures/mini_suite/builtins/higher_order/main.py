def square(x):
    return x * x


def main():
    values = map(square, [1, 2])
    return list(values)


main()
