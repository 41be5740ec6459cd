# Evaluation metrics: structure (TEDS), content (chrF over key-value triples), retrieval recall
from src.metrics.chrf import chrf, chrf_similarity
from src.metrics.content import ContentReport, PairScore, content_similarity, header_similarity, load_value_scorer
from src.metrics.recall import mean_recall_at_k, recall_at_k
from src.metrics.tree_edit import structure_tree, teds, tree_edit_distance, tree_size
