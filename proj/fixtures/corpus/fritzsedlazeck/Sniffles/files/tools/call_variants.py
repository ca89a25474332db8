import sys

print("##fileformat=VCFv4.2-like")
print("#CHROM\tPOS\tTYPE\tINFO")
with open(sys.argv[1]) as fh:
    for line in fh:
        if line.startswith("SVMARK "):
            _, svtype, chrom, pos, info = line.split()
            print("SV\t%s\t%s\t%s\t%s" % (chrom, pos, svtype, info))
