# DocTabQA toolkit: question answering over long documents with hierarchical tables
