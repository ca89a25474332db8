import argparse

parser = argparse.ArgumentParser(prog="envtool.py")
parser.add_argument("--prepare", action="store_true")
parser.add_argument("--lock", action="store_true")
args = parser.parse_args()

if args.prepare:
    open(".env_ready", "w").write("ready\n")
if args.lock:
    print("environment locked")
