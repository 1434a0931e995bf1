"""Writes data/swda_collapse.tsv: raw SwDA act tags -> 42 clustered labels.

The raw inventory is every base tag combined with the annotation suffixes and
markers seen in the release; the clustering follows the coding manual.
"""
import itertools
import re
import sys

BASES = ["sd", "sv", "aa", "b", "ba", "%", "x", "fc", "qy", "qw", "nn", "ny", "bk", "h",
         "qo", "qh", "ar", "ng", "br", "no", "fp", "qrr", "t3", "t1", "bd", "fa", "ft",
         "ad", "bf", "na", "^2", "^q", "^h", "^g", "fo", "o", "fw", '"', "by", "bc", "oo",
         "co", "cc", "aap", "am", "arp", "nd", "fe", "fx", "qr", "bh", "sd(^q)", "sv(^q)"]
SUFFIXES = ["", "^2", "^g", "^m", "^r", "^e", "^q", "^h", "^t", "^c", "^d", "^2^g",
            "^r^t", "^d^t", "^d^r", "^g^t", "^m^r", "^e^r"]
WRAP = ["{}", "({})", "{}*", "{}@", "*{}", "{}(^q)"]


def collapse(tag):
    if tag in ("qy^d", "qw^d", "b^m"):
        return tag
    if tag == "nn^e":
        return "ng"
    if tag == "ny^e":
        return "na"
    tag = re.sub(r"(.)\^.*", r"\1", tag)
    tag = re.sub(r"[\(\)@*]", "", tag)
    if tag in ("qr", "qy"):
        return "qy"
    if tag in ("fe", "ba"):
        return "ba"
    if tag in ("oo", "co", "cc"):
        return "oo_co_cc"
    if tag in ("fx", "sv"):
        return "sv"
    if tag in ("aap", "am"):
        return "aap_am"
    if tag in ("arp", "nd"):
        return "arp_nd"
    if tag in ("fo", "o", "fw", '"', "by", "bc"):
        return 'fo_o_fw_"_by_bc'
    return tag


LABELS = set("""sd b sv aa % ba qy x ny fc qw nn bk h qy^d fo_o_fw_"_by_bc bh ^q bf na ad
^2 b^m qo qh ^h ar ng br no fp qrr arp_nd t3 oo_co_cc t1 bd aap_am ^g qw^d fa ft""".split())
assert len(LABELS) == 42

rows = {}
for base, suf, wrap in itertools.product(BASES, SUFFIXES, WRAP):
    raw = wrap.format(base + suf)
    label = collapse(raw)
    if label in LABELS:
        rows.setdefault(raw, label)
for extra, label in [("%-", "%"), ("-", "%"), ("%", "%"), ("x", "x"), ("qw^d", "qw^d"),
                     ("qy^d", "qy^d"), ("b^m", "b^m"), ("nn^e", "ng"), ("ny^e", "na")]:
    rows[extra] = label

out = sys.stdout if len(sys.argv) < 2 else open(sys.argv[1], "w")
out.write("# raw_tag\tcollapsed_label (edit freely; unmapped raw tags are a hard error)\n")
for raw in sorted(rows):
    out.write(f"{raw}\t{rows[raw]}\n")
