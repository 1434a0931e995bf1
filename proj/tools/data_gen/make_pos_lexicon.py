"""Writes data/pos_lexicon.tsv: closed-class words plus the template bank's
open-class fields, tagged with Penn Treebank tags."""
import json
import re
import sys

CLOSED = {
    "i": "PRP", "you": "PRP", "he": "PRP", "she": "PRP", "it": "PRP", "we": "PRP",
    "they": "PRP", "me": "PRP", "him": "PRP", "her": "PRP$", "us": "PRP", "them": "PRP",
    "my": "PRP$", "your": "PRP$", "our": "PRP$", "their": "PRP$", "his": "PRP$", "its": "PRP$",
    "a": "DT", "an": "DT", "the": "DT", "this": "DT", "that": "DT", "these": "DT",
    "those": "DT", "some": "DT", "any": "DT", "all": "DT", "no": "DT", "every": "DT",
    "and": "CC", "or": "CC", "but": "CC", "so": "RB", "because": "IN", "about": "IN",
    "of": "IN", "in": "IN", "on": "IN", "at": "IN", "with": "IN", "from": "IN", "for": "IN",
    "to": "TO", "as": "IN", "by": "IN", "before": "IN", "if": "IN",
    "is": "VBZ", "are": "VBP", "am": "VBP", "was": "VBD", "were": "VBD", "be": "VB",
    "been": "VBN", "do": "VBP", "does": "VBZ", "did": "VBD", "has": "VBZ", "had": "VBD",
    "have": "VBP", "m": "VBP", "s": "VBZ", "re": "VBP", "d": "MD", "ll": "MD", "t": "RB",
    "don": "VBP", "can": "MD", "could": "MD", "would": "MD", "will": "MD", "should": "MD",
    "might": "MD", "must": "MD", "shall": "MD", "not": "RB", "never": "RB",
    "what": "WP", "who": "WP", "which": "WDT", "where": "WRB", "when": "WRB", "why": "WRB",
    "how": "WRB", "there": "EX", "here": "RB", "then": "RB", "now": "RB", "too": "RB",
    "yes": "UH", "yeah": "UH", "yep": "UH", "yup": "UH", "okay": "UH", "ok": "UH",
    "sure": "UH", "alright": "UH", "nope": "UH", "nah": "UH", "hello": "UH", "hi": "UH",
    "hey": "UH", "howdy": "UH", "hiya": "UH", "yo": "UH", "bye": "UH", "goodbye": "UH",
    "um": "UH", "uh": "UH", "hmm": "UH", "er": "UH", "erm": "UH", "uhm": "UH", "mm": "UH",
    "well": "UH", "oh": "UH", "wow": "UH", "mhm": "UH", "huh": "UH", "hmm": "UH",
    "please": "UH", "thanks": "NNS", "thank": "VBP", "cheers": "UH", "aye": "UH",
    "nay": "UH", "righto": "UH", "dunno": "VBP", "alexa": "NNP", "let": "VB",
    "like": "VBP", "more": "JJR", "something": "NN", "anything": "NN", "else": "RB",
    "really": "RB", "very": "RB", "just": "RB", "also": "RB", "not": "RB", "up": "RP",
    "one": "CD", "lot": "NN", "much": "JJ", "many": "JJ", "best": "JJS", "next": "JJ",
    "favorite": "JJ", "good": "JJ", "nice": "JJ", "fun": "JJ", "interesting": "JJ",
}

FIELD_TAGS = {
    "opinion_verb": "VBP", "negative_verb": "VBP", "opinion_adj": "JJ", "intensifier": "RB",
    "wh": None, "have_verb": "VBP", "modal": "MD", "action_verb": "VB", "pet": "NN",
    "place": "NNP", "time": "NN", "person": "NN", "past_verb": "VBD", "job": "NN",
    "number": "CD", "filler": "UH", "greet": "UH", "affirm": "UH", "reject": "UH",
    "closing": "VB", "joke_noun": "NN", "hedge": "RB", "directive": "VB",
    "appreciation": "JJ", "agree_phrase": "JJ", "thanks": "UH", "dunno": "VB",
    "request": "VB", "chat_start": "VB", "reject_tail": "VB", "affirm_tail": "VB",
    "fragment": "NN", "backchannel": "UH", "ack": "UH", "yes_answer": "UH",
    "no_answer": "UH",
}


def tokens(text):
    return [t for t in re.split(r"[^a-z0-9-]+", text.lower()) if t]


def main(path, out):
    bank = json.load(open(path))
    lex = dict(CLOSED)
    for field, values in bank["fields"].items():
        tag = FIELD_TAGS.get(field)
        if tag is None:
            continue
        for phrase in values:
            for tok in tokens(phrase):
                lex.setdefault(tok, tag)
    for topic in bank["topics"].values():
        for w in topic["words"]:
            for tok in tokens(w):
                lex.setdefault(tok, "NNS" if tok.endswith("s") else "NN")
        for item in topic["items"]:
            for tok in tokens(item):
                lex.setdefault(tok, "NNP")
    with open(out, "w") as f:
        f.write("# word\tPenn tag\n")
        for w in sorted(lex):
            f.write(f"{w}\t{lex[w]}\n")


main(sys.argv[1], sys.argv[2])
