# Sentence store, question/sentence rewriting and top-K retrieval
from src.retrieval.sentences import split_sentences
from src.retrieval.store import DocumentStore, Sentence, embed_store
from src.retrieval.rewrite import QuestionRewrite, rewrite_question, rewrite_sentences
from src.retrieval.search import RankedSentence, RetrievalRecord, retrieve_top_k
from src.retrieval.llm_ranker import rank_by_llm_relevance
