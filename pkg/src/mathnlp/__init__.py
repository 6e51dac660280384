"""Math-aware text analysis: key-phrase extraction and top-level MSC classification.

The pipeline runs formula masking, sentence segmentation, tokenization,
HMM/Viterbi part-of-speech tagging, dictionary-driven entity recognition,
noun-phrase chunking with frequency aggregation, and Naive Bayes / linear
SVM subject classification. See :func:`mathnlp.pipeline.analyze_document`
for the end-to-end entry point.
"""

__version__ = "0.1.0"

PIPELINE_VERSION = __version__
