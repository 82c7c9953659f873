"""Two-class classification by compressed length."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .codetable import CodeTable, encoded_length_transaction
from .core import Dataset, DomainError, Itemset, LabeledDataset
from .pipeline import ModelParams, build_model

BENIGN = "benign"
MALWARE = "malware"


@dataclass(frozen=True)
class ClassifierModel:
    """Class 1 / class 2 code tables; ties in encoded length go to class 2."""

    ct_class1: CodeTable
    ct_class2: CodeTable
    label1: str = BENIGN
    label2: str = MALWARE

    def lengths(self, t: Iterable[int]) -> tuple[float, float]:
        t = tuple(t)
        return encoded_length_transaction(self.ct_class1, t), encoded_length_transaction(self.ct_class2, t)


def classify(model: ClassifierModel, t: Iterable[int]) -> str:
    l1, l2 = model.lengths(t)
    return model.label2 if l2 <= l1 else model.label1


def train_classifier(data: LabeledDataset, params: ModelParams | None = None,
                     malware_params: ModelParams | None = None) -> ClassifierModel:
    """Benign table as class 1, malware table as class 2, over the union alphabet."""
    params = params or ModelParams()
    ct_b = build_model(data.benign, params)
    ct_m = build_model(data.malware, malware_params or params)
    return ClassifierModel(ct_b, ct_m, BENIGN, MALWARE)


@dataclass(frozen=True)
class Metrics:
    tp: int
    tn: int
    fp: int
    fn: int
    skipped: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def fpr(self) -> float:
        neg = self.tn + self.fp
        return self.fp / neg if neg else 0.0

    @property
    def fnr(self) -> float:
        """Also the evasion rate of the malware samples."""
        pos = self.tp + self.fn
        return self.fn / pos if pos else 0.0

    def as_dict(self) -> dict:
        return {"accuracy": self.accuracy, "fpr": self.fpr, "fnr": self.fnr,
                "tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn, "skipped": self.skipped}


def classify_batch(model: ClassifierModel, samples: Iterable[Itemset]) -> tuple[list[str | None], int]:
    """Labels per sample (``None`` for samples with unseen items) and the skip count."""
    out: list[str | None] = []
    skipped = 0
    for t in samples:
        try:
            out.append(classify(model, t))
        except DomainError:
            out.append(None)
            skipped += 1
    return out, skipped


def evaluate(model: ClassifierModel, labeled: LabeledDataset | tuple[Dataset, Dataset],
             positive: str = MALWARE) -> Metrics:
    """Confusion counts with malware as the positive class."""
    benign, malware = (labeled.benign, labeled.malware) if isinstance(labeled, LabeledDataset) else labeled
    tp = tn = fp = fn = 0
    b_labels, skip_b = classify_batch(model, benign)
    m_labels, skip_m = classify_batch(model, malware)
    for lab in b_labels:
        if lab is None:
            continue
        if lab == positive:
            fp += 1
        else:
            tn += 1
    for lab in m_labels:
        if lab is None:
            continue
        if lab == positive:
            tp += 1
        else:
            fn += 1
    return Metrics(tp, tn, fp, fn, skip_b + skip_m)
