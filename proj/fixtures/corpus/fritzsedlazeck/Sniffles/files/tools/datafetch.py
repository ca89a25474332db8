"""Minimal offline fetcher: copies file:// URLs (or plain paths) to --out."""
import argparse
import shutil


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", required=True)
    parser.add_argument("url")
    args = parser.parse_args()
    src = args.url
    if src.startswith("file://"):
        src = src[len("file://"):]
    shutil.copyfile(src, args.out)
    with open(args.out, "rb") as fh:
        size = len(fh.read())
    print("copied %d bytes" % size)


if __name__ == "__main__":
    main()
