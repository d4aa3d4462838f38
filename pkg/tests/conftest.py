import pytest

from aumann import KnowledgeModel


@pytest.fixture
def model_a() -> KnowledgeModel:
    """Five worlds; the partitions interlock so the meet is trivial."""
    return KnowledgeModel.from_blocks(5, [[[0, 1], [2, 3], [4]], [[0], [1, 2], [3, 4]]])


@pytest.fixture
def model_b() -> KnowledgeModel:
    """Four worlds; agent 1 refines agent 0 on the upper half."""
    return KnowledgeModel.from_blocks(4, [[[0, 1], [2, 3]], [[0, 1], [2], [3]]])
