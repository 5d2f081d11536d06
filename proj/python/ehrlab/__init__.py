"""Python bindings for ehrlab: first-order games and statistics on sparse
random graphs. Graphs are dicts {"n": int, "edges": [[u, v], ...]}; every
result is a dict mirroring the command-line JSON."""

import json

from . import _ehrlab

__all__ = [
    "EhrlabError",
    "Game",
    "build_model",
    "classify",
    "completion",
    "estimate",
    "event_names",
    "no_short_cycle_limit",
    "sample",
    "solve",
    "types",
    "verify_theory",
]

EhrlabError = _ehrlab.EhrlabError
"""Raised for library errors; ``args`` is ``(kind, message)``."""


def _dump(value):
    return json.dumps(value)


def classify(graph):
    return json.loads(_ehrlab.classify(_dump(graph)))


def types(graph, m, k, s=None):
    return json.loads(_ehrlab.types(_dump(graph), m, k, s))


def completion(graph, k, M1, M2):
    return json.loads(_ehrlab.completion(_dump(graph), k, M1, M2))


def verify_theory(graph, ell_max, m, k):
    return json.loads(_ehrlab.verify_theory(_dump(graph), ell_max, m, k))


def solve(left, right, k, dehr=False, budget=None):
    return json.loads(_ehrlab.solve(_dump(left), _dump(right), k, dehr, budget))


def sample(n, c, seed, trial=0):
    return json.loads(_ehrlab.sample(_dump({"n": n, "c": c, "seed": seed, "trial": trial})))


def estimate(event, n, c, trials, seed, params=None, workers=1, per_trial=False):
    request = {"event": event, "params": params or {}, "n": n, "c": c, "trials": trials, "seed": seed,
               "workers": workers, "per_trial": per_trial}
    return json.loads(_ehrlab.estimate(_dump(request)))


def build_model(spec):
    return json.loads(_ehrlab.build_model(_dump(spec)))


def no_short_cycle_limit(c, M1):
    """(paper, standard) closed forms of the no-short-cycle limit."""
    return _ehrlab.no_short_cycle_limit(c, M1)


def event_names():
    return list(_ehrlab.event_names())


class Game:
    """Spoiler-vs-Duplicator session; the request has the same fields as the
    HTTP endpoint POST /game/new."""

    def __init__(self, left=None, right=None, k=1, base=3, shift=0, enrich=False, left_model_spec=None,
                 right_model_spec=None):
        request = {"k": k, "base": base, "shift": shift, "enrich": enrich}
        for side, graph, spec in (("left", left, left_model_spec), ("right", right, right_model_spec)):
            if spec is not None:
                request[f"{side}_model_spec"] = spec
            else:
                request[f"{side}_graph"] = graph
        self._game = _ehrlab.Game(_dump(request))

    def move(self, side, vertex):
        return json.loads(self._game.move(side, vertex))

    def state(self):
        return json.loads(self._game.state())

    def legal_moves(self):
        return json.loads(self._game.legal_moves())

    @property
    def finished(self):
        return self._game.finished
