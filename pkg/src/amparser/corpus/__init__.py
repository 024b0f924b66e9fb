"""AMR corpora: reading, preprocessing, alignment, decomposition into AM
treebanks, count-based scoring and Smatch evaluation."""

from .align import AlignerWeights, Alignment, align
from .amr import AmrEntry, AmrSyntaxError, parse_amr, read_corpus, render_amr, write_corpus
from .convert import ConvertConfig, ConvertResult, convert_corpus, format_stats, strip_wiki
from .decompose import REJECT_CODES, Decomposition, DecompositionError, decompose
from .lex import LEX, Lexicon, delexicalize, relexicalize, tree_to_amr
from .pipeline import ParseOutcome, dummy_graph, parse_sentence
from .policy import BlobPolicy
from .preprocess import Preprocessed, Record, postprocess, preprocess
from .scorer import CountScorer, ScorerConfig, score_sentence, train_count_scorer
from .smatch import SmatchCounts, corpus_smatch, smatch, smatch_counts

__all__ = [
    "AlignerWeights",
    "Alignment",
    "AmrEntry",
    "AmrSyntaxError",
    "BlobPolicy",
    "ConvertConfig",
    "ConvertResult",
    "CountScorer",
    "Decomposition",
    "DecompositionError",
    "LEX",
    "Lexicon",
    "ParseOutcome",
    "Preprocessed",
    "REJECT_CODES",
    "Record",
    "ScorerConfig",
    "SmatchCounts",
    "align",
    "convert_corpus",
    "corpus_smatch",
    "decompose",
    "delexicalize",
    "dummy_graph",
    "format_stats",
    "parse_amr",
    "parse_sentence",
    "postprocess",
    "preprocess",
    "read_corpus",
    "relexicalize",
    "render_amr",
    "score_sentence",
    "smatch",
    "smatch_counts",
    "strip_wiki",
    "train_count_scorer",
    "tree_to_amr",
    "write_corpus",
]
