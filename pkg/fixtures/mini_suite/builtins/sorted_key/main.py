def keyfn(item):
    return item


def main():
    return sorted([3, 1], key=keyfn)


main()
