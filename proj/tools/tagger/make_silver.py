#!/usr/bin/env python3
"""Builds silver POS training data for train_tagger.

Input: tokenized sentences (one per line, tokens separated by spaces), as
written by tokenize_dump. Output: word/TAG lines.

Tags come from Pattern's Brill tagger (shipped inside textblob), followed by
deterministic relabeling rules that fix its most frequent systematic errors
(sentence-initial capitals, finite vs. base verbs, past vs. participle).

usage: make_silver.py VERBS_TXT < tokens.txt > tagged.txt
"""
import sys

from textblob.en import tag

BE_HAVE = {"be", "is", "are", "was", "were", "been", "being", "am", "'s", "'re", "'m",
           "has", "have", "had", "having", "'ve", "'d", "get", "got", "gets", "getting"}
EX_FOLLOW = {"is", "are", "was", "were", "'s", "be", "been", "seems", "seem", "seemed",
             "exist", "exists", "existed", "remain", "remains", "remained", "will", "would",
             "must", "may", "might", "can", "could", "should", "has", "have", "had"}
SUBJ_PRP = {"i", "you", "we", "they", "he", "she", "it"}
CLAUSE_BREAK = {",", ".", ";", ":", "CC", "IN", "WDT", "WP", "WRB"}


def load_verbs(path):
    lemmas, past, part, third = set(), set(), set(), set()
    for line in open(path, encoding="utf-8"):
        if line.startswith(";;;"):
            continue
        f = line.strip().split(",")
        if len(f) < 12 or not f[0]:
            continue
        lemmas.add(f[0])
        if f[3]:
            third.add(f[3])
        if f[10]:
            past.add(f[10])
        if f[11]:
            part.add(f[11])
    return lemmas, past, part, third


def back(tags, i):
    """Index of the nearest token before i that is not an adverb."""
    j = i - 1
    while j >= 0 and tags[j] in ("RB", "RBR", "RBS"):
        j -= 1
    return j


def lexicon_tag(word):
    from textblob.en import lexicon  # Pattern lexicon (word -> most frequent tag)
    return lexicon.get(word)


def aux_before(words, tags, i):
    """True when an auxiliary or modal sits earlier in the same clause."""
    j = i - 1
    while j >= 0 and tags[j] not in CLAUSE_BREAK:
        if tags[j] == "MD" or words[j].lower() in BE_HAVE or tags[j] == "TO":
            return True
        j -= 1
    return False


def verb_before(tags, i):
    j = i - 1
    while j >= 0 and tags[j] not in CLAUSE_BREAK:
        if tags[j].startswith("VB") or tags[j] in ("MD", "TO"):
            return True
        j -= 1
    return False


def relabel(words, tags, lemmas, past, part, third):
    n = len(words)
    low = [w.lower() for w in words]
    for i in range(n):
        w, t = low[i], tags[i]
        prev = tags[i - 1] if i > 0 else "^"
        prevw = low[i - 1] if i > 0 else ""
        nxt = tags[i + 1] if i + 1 < n else "$"
        nxtw = low[i + 1] if i + 1 < n else ""
        b = back(tags, i)
        btag = tags[b] if b >= 0 else "^"
        bword = low[b] if b >= 0 else ""
        subject = btag == "NNS" or (btag == "PRP" and bword in SUBJ_PRP and bword not in ("he", "she", "it"))
        # Base form after to, modals and do-support (adverbs may intervene).
        if (btag in ("TO", "MD") or bword in ("do", "does", "did")) and w in lemmas \
                and t in ("NN", "JJ", "VBP", "NNS"):
            tags[i] = "VB"
        # Finite base form after a plural or pronoun subject.
        elif t in ("VB", "NN", "JJ") and w in lemmas and subject and not verb_before(tags, b) \
                and (t == "VB" or nxt in ("DT", "PRP$", "PRP", "TO", "NN", "NNS")):
            tags[i] = "VBP"
        # Third-person verb read as a plural noun after a singular subject.
        elif t == "NNS" and w in third and (btag in ("NN", "NNP") or bword in ("he", "she", "it")) \
                and nxt in ("DT", "PRP$", "PRP", "IN", "TO", "JJ", "RB") and not verb_before(tags, b) \
                and (b < 1 or tags[b - 1] not in ("JJ",)):
            tags[i] = "VBZ"
        # have/be (+ adverbs) + past form -> participle.
        elif t == "VBD" and w in part:
            j = i - 1
            while j >= 0 and tags[j] in ("RB", "RBR"):
                j -= 1
            if j >= 0 and low[j] in BE_HAVE:
                tags[i] = "VBN"
        # Subject + participle with no auxiliary -> simple past.
        elif t == "VBN" and w in past and not aux_before(words, tags, i):
            if prev == "PRP" and prevw in SUBJ_PRP:
                tags[i] = "VBD"
            elif prev in ("NN", "NNS", "NNP") and nxt in ("DT", "PRP$", "PRP", "IN", "TO", "RB", "JJ") \
                    and any(tags[k] in ("DT", "PRP$", "NNP") for k in range(max(0, i - 3), i)) \
                    and i - 2 >= 0 and not verb_before(tags, i - 1) and nxtw != "by":
                tags[i] = "VBD"
        # Gerund-looking nouns after determiners and possessives.
        elif t == "VBG" and prev in ("DT", "PRP$", "JJ", "POS") and nxt in ("IN", ".", ",", "NN", "NNS", "$", ":"):
            tags[i] = "NN"
        if w == "there":
            tags[i] = "EX" if nxtw in EX_FOLLOW else "RB"
        if w in ("much", "far") and nxt in ("JJR", "RBR"):
            tags[i] = "RB"
        if w == "outside" and nxt in (".", ",", "CC", "$", ":"):
            tags[i] = "RB"
        if w == "most" and nxtw == "of":
            tags[i] = "JJS"
    return tags


def main():
    lemmas, past, part, third = load_verbs(sys.argv[1])
    for line in sys.stdin:
        words = line.split()
        if not words:
            continue
        # Tag with a lowercased first word so capitalization does not force NNP.
        first = words[0]
        probe = list(words)
        if first[:1].isupper() and first[1:].islower() \
                and lexicon_tag(first.lower()) not in (None, "NNP", "NNPS"):
            probe[0] = first.lower()
        tagged = tag(" ".join(probe), tokenize=False)
        if len(tagged) != len(words):
            continue
        # Collapse Brill's ambiguity tags (e.g. VBN|JJ) to their first choice.
        tags = relabel(words, [t.split("|")[0] for _, t in tagged], lemmas, past, part, third)
        print(" ".join(f"{w}/{t}" for w, t in zip(words, tags)))


if __name__ == "__main__":
    main()
