"""Entry point that boots the trader UI; requires a configured gateway."""

if __name__ == "__main__":
    raise SystemExit("configure a broker gateway before starting the trader")
