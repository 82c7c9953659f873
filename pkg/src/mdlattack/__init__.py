"""MDL code tables over transactional data, compression-based classification,
and black-box adversarial example generation by pattern addition."""

from .advgen import AdversarialResult, batch_generate, generate
from .cfpm import MinedPattern, MinsupSpec, brute_force_closed, mine_closed, order_candidates
from .classify import ClassifierModel, Metrics, classify, evaluate, train_classifier
from .clope import Cluster, Clustering, cluster, partition_hq, quality
from .codetable import (CodeTable, CodeTableRow, build_krimp, cover, encoded_length_dataset,
                        encoded_length_transaction, model_length, recompute_usages, standard_code_table,
                        total_length)
from .core import Dataset, DomainError, Itemset, LabeledDataset, ParseError, load_dataset, make_itemset, support
from .pipeline import ModelParams, build_model, candidates_via_clustering

__version__ = "0.1.0"
