"""Evaluation reports for learned mappings."""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from lexalign.embeddings import AlignedLexicon, EmbeddingTable
from lexalign.evaluation.metrics import precision_table, retrieve_for_lexicon
from lexalign.metric import RetrievalMethod


@dataclass
class EvalReport:
    """Translation accuracy of one mapping under one retrieval method."""
    method: str
    precision_at: Dict[int, float] = field(default_factory=dict)
    n_queries: int = 0
    oov_queries: int = 0
    criterion_value: Optional[float] = None
    predictions: Optional[Dict[str, List[str]]] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        d = {
            "method": self.method,
            "precision_at": {str(k): v for k, v in sorted(self.precision_at.items())},
            "n_queries": self.n_queries,
            "oov_queries": self.oov_queries,
            "criterion_value": self.criterion_value,
        }
        if self.predictions is not None:
            d["predictions"] = self.predictions
        return d


@dataclass
class EvaluationSummary:
    """Reports for every retrieval method, sharing one test dictionary."""
    reports: List[EvalReport] = field(default_factory=list)

    def __getitem__(self, method: Union[str, RetrievalMethod]) -> EvalReport:
        name = RetrievalMethod(method).value
        for report in self.reports:
            if report.method == name:
                return report
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {"reports": [r.to_dict() for r in self.reports]}

    def write_json(self, path: Union[str, Path]) -> None:
        output = Path(path)
        output.parent.mkdir(parents=True, exist_ok=True)
        with open(output, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)


def evaluate_mapping(
    W,
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    gold: AlignedLexicon,
    ks: Sequence[int] = (1, 5, 10),
    methods: Sequence[Union[str, RetrievalMethod]] = (RetrievalMethod.CSLS, RetrievalMethod.NN_COSINE),
    csls_k: int = 10,
    max_targets: Optional[int] = None,
    criterion_value: Optional[float] = None,
    keep_predictions: bool = False,
) -> EvaluationSummary:
    """
    precision@k of a mapping against a gold dictionary, per retrieval method.

    Args:
        W: Mapping
        src: Normalized source table
        tgt: Normalized target table
        gold: Test dictionary, already restricted to the vocabularies
        ks: Cut-off ranks
        methods: Retrieval methods to report
        csls_k: CSLS neighborhood size
        max_targets: Candidate target rows
        criterion_value: Unsupervised criterion of W, copied into each report
        keep_predictions: Also store the ranked target words per query
    """
    topn = max(ks)
    summary = EvaluationSummary()
    for method in methods:
        method = RetrievalMethod(method)
        index = retrieve_for_lexicon(W, src, tgt, gold, method=method, k=csls_k, topn=topn, max_targets=max_targets)
        predictions = None
        if keep_predictions:
            predictions = {
                src.words[q]: [tgt.words[t] for t in index.ids[i]]
                for i, q in enumerate(index.query_ids)
            }
        summary.reports.append(EvalReport(
            method=method.value,
            precision_at=precision_table(index, gold, ks),
            n_queries=len(gold.sources()),
            oov_queries=gold.oov,
            criterion_value=criterion_value,
            predictions=predictions,
        ))
    return summary
