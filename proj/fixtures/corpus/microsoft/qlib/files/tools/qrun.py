import os
import sys


def read_config(path):
    cfg = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or ":" not in line:
                continue
            key, value = line.split(":", 1)
            cfg[key.strip()] = value.strip()
    return cfg


def main():
    cfg = read_config(sys.argv[1])
    if "output_dir" not in cfg:
        sys.stderr.write("qrun failed while loading config.yaml\n")
        sys.stderr.write("KeyError: 'output_dir'\n")
        sys.stderr.write("hint: the run config must name an output directory\n")
        raise SystemExit(1)
    out_dir = cfg["output_dir"]
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "signals.csv"), "w") as fh:
        fh.write("date,instrument,score\n")
        for day in range(1, 6):
            fh.write("2020-01-%02d,SH600000,0.%03d\n" % (day, day * 7))
    print(
        "generated signals for strategy=%s universe=%s into %s/signals.csv"
        % (cfg.get("strategy", "?"), cfg.get("universe", "?"), out_dir)
    )


if __name__ == "__main__":
    main()
