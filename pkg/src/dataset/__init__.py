# Annotation pipeline: cell matching, coverage filter, triples, corpus statistics
from src.dataset.numbers import NumericToken, find_numbers, parse_number
from src.dataset.matching import CellMatch, apply_review, match_cells_to_sentences
from src.dataset.filtering import Candidate, FilterResult, coverage_ratio, filter_tables
from src.dataset.questions import QuestionDraft, build_question_prompt, parse_question_response
from src.dataset.records import (
    DocumentRecord,
    ExclusionEntry,
    GeneratedRecord,
    QaTriple,
    ReviewEntry,
    TableRecord,
    read_jsonl,
    write_json,
    write_jsonl,
)
from src.dataset.stats import CorpusStats, corpus_stats
from src.dataset.annotate import AnnotationResult, annotate_corpus
