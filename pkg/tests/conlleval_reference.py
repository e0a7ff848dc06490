"""Independent IOB chunk scorer used as a test oracle.

Streaming state-machine port of the classic shared-task scorer: chunk
starts and ends are decided by adjacent-tag predicates and a chunk is
correct only when gold and prediction agree on both boundaries and the
type. Deliberately written with a different algorithm than the package
evaluator (which intersects chunk sets) so the two can disagree.

Division convention here matches the original script: any zero
denominator gives 0. The package treats the nothing-gold/nothing-found
corner as 100 instead, so parity cases must contain at least one chunk.
"""

from collections import defaultdict


def _parse(tag):
    if tag == "O" or not tag:
        return "O", ""
    if tag[:2] in ("B-", "I-"):
        return tag[0], tag[2:]
    return "O", ""


def _end_of_chunk(prev_tag, tag, prev_type, type_):
    if prev_tag == "B" and tag in ("B", "O"):
        return True
    if prev_tag == "I" and tag in ("B", "O"):
        return True
    if prev_tag != "O" and prev_type != type_:
        return True
    return False


def _start_of_chunk(prev_tag, tag, prev_type, type_):
    if tag == "B":
        return True
    if prev_tag == "O" and tag == "I":
        return True
    if tag != "O" and prev_type != type_:
        return True
    return False


def score(gold_seqs, pred_seqs):
    """Returns the same report structure the package evaluator emits."""
    assert len(gold_seqs) == len(pred_seqs)
    gold_n = pred_n = correct_n = 0
    t_gold = defaultdict(int)
    t_pred = defaultdict(int)
    t_correct = defaultdict(int)
    tokens = tokens_correct = 0

    for g_seq, p_seq in zip(gold_seqs, pred_seqs):
        assert len(g_seq) == len(p_seq)
        tokens += len(g_seq)
        tokens_correct += sum(1 for a, b in zip(g_seq, p_seq) if a == b)
        last_g, last_gt = "O", ""
        last_p, last_pt = "O", ""
        in_correct = False
        # Trailing sentinel closes any open chunk.
        for g_raw, p_raw in list(zip(g_seq, p_seq)) + [("O", "O")]:
            g, gt = _parse(g_raw)
            p, pt = _parse(p_raw)
            end_g = _end_of_chunk(last_g, g, last_gt, gt)
            end_p = _end_of_chunk(last_p, p, last_pt, pt)
            start_g = _start_of_chunk(last_g, g, last_gt, gt)
            start_p = _start_of_chunk(last_p, p, last_pt, pt)
            if in_correct:
                if end_g and end_p and last_gt == last_pt:
                    in_correct = False
                    correct_n += 1
                    t_correct[last_gt] += 1
                elif end_g != end_p or gt != pt:
                    in_correct = False
            if start_g and start_p and gt == pt:
                in_correct = True
            if start_g:
                gold_n += 1
                t_gold[gt] += 1
            if start_p:
                pred_n += 1
                t_pred[pt] += 1
            last_g, last_gt = g, gt
            last_p, last_pt = p, pt

    def prf(correct, pred, gold):
        p = 100.0 * correct / pred if pred else 0.0
        r = 100.0 * correct / gold if gold else 0.0
        f = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
        return p, r, f

    p, r, f = prf(correct_n, pred_n, gold_n)
    report = {"precision": p, "recall": r, "f1": f,
              "gold": gold_n, "predicted": pred_n, "correct": correct_n,
              "tokens": tokens,
              "token_accuracy": 100.0 * tokens_correct / tokens if tokens else 0.0,
              "types": {}}
    for t in sorted(set(t_gold) | set(t_pred)):
        tp, tr, tf = prf(t_correct[t], t_pred[t], t_gold[t])
        report["types"][t] = {"precision": tp, "recall": tr, "f1": tf,
                              "gold": t_gold[t], "predicted": t_pred[t],
                              "correct": t_correct[t]}
    return report


# 25 crafted corpora: (gold sequences, predicted sequences). Each corpus
# has at least one gold or predicted chunk so both division conventions
# agree; several contain IOB violations a model could emit.
PARITY_CASES = [
    # 1 exact match, one chunk
    ([["O", "B-city", "O"]], [["O", "B-city", "O"]]),
    # 2 gold chunk entirely missed
    ([["B-city", "I-city", "O"]], [["O", "O", "O"]]),
    # 3 spurious predicted chunk
    ([["O", "O", "O"]], [["O", "B-day", "O"]]),
    # 4 I after O on both sides (violation, same reading)
    ([["O", "I-city", "I-city"]], [["O", "I-city", "I-city"]]),
    # 5 I after O only in the prediction
    ([["O", "B-city", "I-city"]], [["O", "I-city", "I-city"]]),
    # 6 boundary off by one (prediction starts late)
    ([["B-city", "I-city", "I-city", "O"]], [["O", "B-city", "I-city", "O"]]),
    # 7 same span, wrong type
    ([["B-city", "I-city", "O"]], [["B-day", "I-day", "O"]]),
    # 8 two adjacent chunks vs one merged chunk
    ([["B-city", "B-city", "O"]], [["B-city", "I-city", "O"]]),
    # 9 merged gold vs split prediction
    ([["B-city", "I-city", "O"]], [["B-city", "B-city", "O"]]),
    # 10 type switch inside a run: I-Y directly after B-X
    ([["B-x", "I-y", "O"]], [["B-x", "I-y", "O"]]),
    # 11 chunk running to the end of the sequence
    ([["O", "B-loc", "I-loc"]], [["O", "B-loc", "I-loc"]]),
    # 12 single-token sequences
    ([["B-a"], ["O"], ["I-b"]], [["B-a"], ["B-c"], ["O"]]),
    # 13 prediction splits a long gold chunk
    ([["B-x", "I-x", "I-x", "I-x"]], [["B-x", "I-x", "B-x", "I-x"]]),
    # 14 prediction merges two gold chunks over an O gap
    ([["B-x", "O", "B-x"]], [["B-x", "I-x", "I-x"]]),
    # 15 types swapped between two chunks
    ([["B-a", "O", "B-b"]], [["B-b", "O", "B-a"]]),
    # 16 long exact chunk plus exact O context
    ([["O", "B-q", "I-q", "I-q", "I-q", "O"]],
     [["O", "B-q", "I-q", "I-q", "I-q", "O"]]),
    # 17 overlapping but unequal spans
    ([["O", "B-x", "I-x", "O"]], [["B-x", "I-x", "O", "O"]]),
    # 18 restart with B inside a run
    ([["B-x", "I-x", "I-x"]], [["B-x", "I-x", "B-x"]]),
    # 19 multiple gold types, prediction all O
    ([["B-a", "O", "B-b", "I-b"]], [["O", "O", "O", "O"]]),
    # 20 second sequence empty on both sides
    ([["B-a", "O"], ["O", "O"]], [["B-a", "O"], ["O", "O"]]),
    # 21 continuation correct but begin tag differs (I vs B start)
    ([["O", "B-x", "I-x"]], [["O", "I-x", "I-x"]]),
    # 22 chunk starting at position 0 with I (violation)
    ([["I-x", "I-x", "O"]], [["I-x", "I-x", "O"]]),
    # 23 three utterances, 4 gold chunks, 3 predicted, 2 correct
    ([["B-a", "O", "B-b"], ["B-c", "I-c", "O"], ["O", "B-d", "O"]],
     [["B-a", "O", "O"], ["B-c", "I-c", "O"], ["B-d", "O", "O"]]),
    # 24 every token begins its own chunk
    ([["B-x", "B-x", "B-x"]], [["B-x", "B-x", "B-x"]]),
    # 25 mixture of violations and type changes across a longer sequence
    ([["O", "I-a", "B-a", "I-b", "I-b", "O", "B-c"]],
     [["O", "B-a", "I-a", "I-b", "O", "I-b", "B-c"]]),
]
