"""Double Metaphone phonetic encoder.

Implements Lawrence Philips' Double Metaphone algorithm (the Atkinson C
lineage commonly used for English sound-alike matching). Codes are strings
over the symbols A F H J K L M N P R S T X 0, with a rare trailing space
in some alternate codes which is kept as emitted.

`double_metaphone_trace` additionally reports, for every primary-code
symbol, the index of the input character whose rule produced it. The pun
splicer uses that to align code positions back to spelling positions.
"""
from __future__ import annotations

_VOWELS = frozenset("AEIOUY")
_SILENT_STARTS = ("GN", "KN", "PN", "WR", "PS")
_PAD = 2


class _Scanner:
    """Single pass over one uppercased word, emitting code symbols."""

    def __init__(self, word: str) -> None:
        raw = word.upper()
        # W/K/CZ spellings get the slavo-germanic treatment in several rules
        self.slavo = ("W" in raw) or ("K" in raw) or ("CZ" in raw)
        self.first = _PAD
        self.last = _PAD + len(raw) - 1
        self.s = "-" * _PAD + raw + " " * 5
        self.primary: list[str] = []
        self.secondary: list[str] = []
        self.trace: list[int] = []

    def run(self) -> tuple[str, str, tuple[int, ...]]:
        s, first, last = self.s, self.first, self.last
        p = first
        if s[first:first + 2] in _SILENT_STARTS:
            p += 1
        if s[first] == "X":
            self._emit(p, "S", "S")
            p += 1
        while p <= last:
            handler = _HANDLERS.get(s[p], _Scanner._default)
            pri, sec, skip = handler(self, p)
            self._emit(p, pri, sec)
            p += skip
        return "".join(self.primary), "".join(self.secondary), tuple(self.trace)

    def _emit(self, p: int, pri: str | None, sec: str | None) -> None:
        # sec=None means "same as primary"; empty strings add nothing
        if sec is None:
            sec = pri
        if pri:
            for ch in pri:
                self.primary.append(ch)
                self.trace.append(p - self.first)
        if sec:
            self.secondary.extend(sec)

    def _default(self, p: int):
        return None, None, 1

    def _vowel(self, p: int):
        if p == self.first:
            return "A", None, 1
        return None, None, 1

    def _b(self, p: int):
        return "P", None, (2 if self.s[p + 1] == "B" else 1)

    def _c(self, p: int):
        s, first = self.s, self.first
        if (p > first + 1 and s[p - 2] not in _VOWELS and s[p - 1:p + 2] == "ACH"
                and (s[p + 2] not in "IE" or s[p - 2:p + 4] in ("BACHER", "MACHER"))):
            return "K", None, 2
        if p == first and s[first:first + 6] == "CAESAR":
            return "S", None, 2
        if s[p:p + 4] == "CHIA":
            return "K", None, 2
        if s[p:p + 2] == "CH":
            if p > first and s[p:p + 4] == "CHAE":
                return "K", "X", 2
            if (p == first
                    and (s[p + 1:p + 6] in ("HARAC", "HARIS")
                         or s[p + 1:p + 4] in ("HOR", "HYM", "HIA", "HEM"))
                    and s[first:first + 5] != "CHORE"):
                return "K", None, 2
            if (s[first:first + 4] in ("VAN ", "VON ") or s[first:first + 3] == "SCH"
                    or s[p - 2:p + 4] in ("ORCHES", "ARCHIT", "ORCHID")
                    or s[p + 2] in "TS"
                    or ((s[p - 1] in "AOUE" or p == first)
                        and s[p + 2] in "LRNMBHFVW ")):
                return "K", None, 1
            if p > first:
                if s[first:first + 2] == "MC":
                    return "K", None, 2
                return "X", "K", 2
            return "X", None, 2
        if s[p:p + 2] == "CZ" and s[p - 2:p + 2] != "WICZ":
            return "S", "X", 2
        if s[p + 1:p + 4] == "CIA":
            return "X", None, 3
        if s[p:p + 2] == "CC" and not (p == first + 1 and s[first] == "M"):
            if s[p + 2] in "IEH" and s[p + 2:p + 4] != "HU":
                if (p == first + 1 and s[first] == "A") or s[p - 1:p + 4] in ("UCCEE", "UCCES"):
                    return "KS", None, 3
                return "X", None, 3
            return "K", None, 2
        if s[p:p + 2] in ("CK", "CG", "CQ"):
            return "K", "K", 2
        if s[p:p + 2] in ("CI", "CE", "CY"):
            if s[p:p + 3] in ("CIO", "CIE", "CIA"):
                return "S", "X", 2
            return "S", None, 2
        if s[p + 1:p + 3] in (" C", " Q", " G"):
            return "K", None, 3
        if s[p + 1] in "CKQ" and s[p + 1:p + 3] not in ("CE", "CI"):
            return "K", None, 2
        return "K", None, 1

    def _d(self, p: int):
        s = self.s
        if s[p:p + 2] == "DG":
            if s[p + 2] in "IEY":
                return "J", None, 3
            return "TK", None, 2
        if s[p:p + 2] in ("DT", "DD"):
            return "T", None, 2
        return "T", None, 1

    def _f(self, p: int):
        return "F", None, (2 if self.s[p + 1] == "F" else 1)

    def _g(self, p: int):
        s, first = self.s, self.first
        if s[p + 1] == "H":
            if p > first and s[p - 1] not in _VOWELS:
                return "K", None, 2
            if p < first + 3:
                if p == first:
                    if s[p + 2] == "I":
                        return "J", None, 2
                    return "K", None, 2
                return None, None, 1
            if s[p - 2] in "BHD" or s[p - 3] in "BHD" or s[p - 4] in "BH":
                return None, None, 2
            if s[p - 1] == "U" and s[p - 3] in "CGLRT":
                return "F", None, 2
            if s[p - 1] != "I":
                return "K", None, 2
            return None, None, 1
        if s[p + 1] == "N":
            if p == first + 1 and s[first] in _VOWELS and not self.slavo:
                return "KN", "N", 2
            if s[p + 2:p + 4] != "EY" and not self.slavo:
                return "N", "KN", 2
            return "KN", None, 2
        if s[p + 1:p + 3] == "LI" and not self.slavo:
            return "KL", "L", 2
        if p == first and (s[p + 1] == "Y" or s[p + 1:p + 3] in
                           ("ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER")):
            return "K", "J", 2
        if (s[p + 1] == "Y" and s[first:first + 6] not in ("DANGER", "RANGER", "MANGER")
                and s[p - 1] not in "EI" and s[p - 1:p + 2] not in ("RGY", "OGY")):
            return "K", "J", 2
        if s[p + 1] in "EIY" or s[p - 1:p + 3] in ("AGGI", "OGGI"):
            if (s[first:first + 4] in ("VON ", "VAN ") or s[first:first + 3] == "SCH"
                    or s[p + 1:p + 3] == "ET"):
                return "K", None, 2
            if s[p + 1:p + 5] == "IER ":
                return "J", None, 2
            return "J", "K", 2
        if s[p + 1] == "G":
            return "K", None, 2
        return "K", None, 1

    def _h(self, p: int):
        s = self.s
        if (p == self.first or s[p - 1] in _VOWELS) and s[p + 1] in _VOWELS:
            return "H", None, 2
        return None, None, 1

    def _j(self, p: int):
        s, first, last = self.s, self.first, self.last
        if s[p:p + 4] == "JOSE" or s[first:first + 4] == "SAN ":
            if (p == first and s[p + 4] == " ") or s[first:first + 4] == "SAN ":
                pri, sec = "H", None
            else:
                pri, sec = "J", "H"
        elif p == first:
            pri, sec = "J", "A"
        elif s[p - 1] in _VOWELS and not self.slavo and s[p + 1] in "AO":
            pri, sec = "J", "H"
        elif p == last:
            pri, sec = "J", " "
        elif s[p + 1] not in "LTKSNMBZ" and s[p - 1] not in "SKL":
            pri, sec = "J", None
        else:
            pri, sec = None, None
        return pri, sec, (2 if s[p + 1] == "J" else 1)

    def _k(self, p: int):
        return "K", None, (2 if self.s[p + 1] == "K" else 1)

    def _l(self, p: int):
        s, last = self.s, self.last
        if s[p + 1] == "L":
            if ((p == last - 2 and s[p - 1:p + 3] in ("ILLO", "ILLA", "ALLE"))
                    or ((s[last - 1:last + 1] in ("AS", "OS") or s[last] in "AO")
                        and s[p - 1:p + 3] == "ALLE")):
                return "L", "", 2
            return "L", None, 2
        return "L", None, 1

    def _m(self, p: int):
        s = self.s
        if (s[p + 1:p + 4] == "UMB" and (p + 1 == self.last or s[p + 2:p + 4] == "ER")) \
                or s[p + 1] == "M":
            return "M", None, 2
        return "M", None, 1

    def _n(self, p: int):
        return "N", None, (2 if self.s[p + 1] == "N" else 1)

    def _p(self, p: int):
        s = self.s
        if s[p + 1] == "H":
            return "F", None, 2
        if s[p + 1] in "PB":
            return "P", None, 2
        return "P", None, 1

    def _q(self, p: int):
        return "K", None, (2 if self.s[p + 1] == "Q" else 1)

    def _r(self, p: int):
        s = self.s
        if (p == self.last and not self.slavo and s[p - 2:p] == "IE"
                and s[p - 4:p - 2] not in ("ME", "MA")):
            pri, sec = "", "R"
        else:
            pri, sec = "R", None
        return pri, sec, (2 if s[p + 1] == "R" else 1)

    def _s(self, p: int):
        s, first, last = self.s, self.first, self.last
        if s[p - 1:p + 2] in ("ISL", "YSL"):
            return None, None, 1
        if p == first and s[first:first + 5] == "SUGAR":
            return "X", "S", 1
        if s[p:p + 2] == "SH":
            if s[p + 1:p + 5] in ("HEIM", "HOEK", "HOLM", "HOLZ"):
                return "S", None, 2
            return "X", None, 2
        if s[p:p + 3] in ("SIO", "SIA") or s[p:p + 4] == "SIAN":
            if not self.slavo:
                return "S", "X", 3
            return "S", None, 3
        if (p == first and s[p + 1] in "MNLW") or s[p + 1] == "Z":
            return "S", "X", (2 if s[p + 1] == "Z" else 1)
        if s[p:p + 2] == "SC":
            if s[p + 2] == "H":
                if s[p + 3:p + 5] in ("OO", "ER", "EN", "UY", "ED", "EM"):
                    if s[p + 3:p + 5] in ("ER", "EN"):
                        return "X", "SK", 3
                    return "SK", None, 3
                if p == first and s[first + 3] not in _VOWELS and s[first + 3] != "W":
                    return "X", "S", 3
                return "X", None, 3
            if s[p + 2] in "IEY":
                return "S", None, 3
            return "SK", None, 3
        if p == last and s[p - 2:p] in ("AI", "OI"):
            return "", "S", 1
        return "S", None, (2 if s[p + 1] in "SZ" else 1)

    def _t(self, p: int):
        s, first = self.s, self.first
        if s[p:p + 4] == "TION":
            return "X", None, 3
        if s[p:p + 3] in ("TIA", "TCH"):
            return "X", None, 3
        if s[p:p + 2] == "TH" or s[p:p + 3] == "TTH":
            if (s[p + 2:p + 4] in ("OM", "AM") or s[first:first + 4] in ("VON ", "VAN ")
                    or s[first:first + 3] == "SCH"):
                return "T", None, 2
            return "0", "T", 2
        if s[p + 1] in "TD":
            return "T", None, 2
        return "T", None, 1

    def _v(self, p: int):
        return "F", None, (2 if self.s[p + 1] == "V" else 1)

    def _w(self, p: int):
        s, first, last = self.s, self.first, self.last
        if s[p:p + 2] == "WR":
            return "R", None, 2
        if p == first and (s[p + 1] in _VOWELS or s[p:p + 2] == "WH"):
            if s[p + 1] in _VOWELS:
                return "A", "F", 1
            return "A", None, 1
        if ((p == last and s[p - 1] in _VOWELS)
                or s[p - 1:p + 5] in ("EWSKI", "EWSKY", "OWSKI", "OWSKY")
                or s[first:first + 3] == "SCH"):
            return "", "F", 1
        if s[p:p + 4] in ("WICZ", "WITZ"):
            return "TS", "FX", 4
        return None, None, 1

    def _x(self, p: int):
        s = self.s
        pri = "KS"
        if p == self.last and (s[p - 3:p] in ("IAU", "EAU") or s[p - 2:p] in ("AU", "OU")):
            pri = None
        return pri, None, (2 if s[p + 1] in "CX" else 1)

    def _z(self, p: int):
        s = self.s
        if s[p + 1] == "H":
            pri, sec = "J", None
        elif s[p + 1:p + 3] in ("ZO", "ZI", "ZA") or (self.slavo and p > self.first and s[p - 1] != "T"):
            pri, sec = "S", "TS"
        else:
            pri, sec = "S", None
        return pri, sec, (2 if s[p + 1] == "Z" else 1)


_HANDLERS = {
    "A": _Scanner._vowel, "E": _Scanner._vowel, "I": _Scanner._vowel,
    "O": _Scanner._vowel, "U": _Scanner._vowel, "Y": _Scanner._vowel,
    "B": _Scanner._b, "C": _Scanner._c, "D": _Scanner._d, "F": _Scanner._f,
    "G": _Scanner._g, "H": _Scanner._h, "J": _Scanner._j, "K": _Scanner._k,
    "L": _Scanner._l, "M": _Scanner._m, "N": _Scanner._n, "P": _Scanner._p,
    "Q": _Scanner._q, "R": _Scanner._r, "S": _Scanner._s, "T": _Scanner._t,
    "V": _Scanner._v, "W": _Scanner._w, "X": _Scanner._x, "Z": _Scanner._z,
}


def double_metaphone(word: str) -> tuple[str, str | None]:
    """Encode one word. Returns (primary, alternate) with alternate None
    when it would equal the primary. Empty input encodes to ("", None)."""
    primary, secondary, _ = _Scanner(word).run()
    if primary == secondary:
        return primary, None
    return primary, secondary


def double_metaphone_trace(word: str) -> tuple[str, str | None, tuple[int, ...]]:
    """Like double_metaphone, plus the source character index of every
    primary symbol (indices into the given word)."""
    primary, secondary, trace = _Scanner(word).run()
    return primary, (None if primary == secondary else secondary), trace
