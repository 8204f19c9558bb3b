import os

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizerFast


@pytest.fixture(scope="session")
def tiny_encoder_dir(tmp_path_factory) -> str:
    """A tiny deterministic sentence encoder with 768-d output, built once.

    A one-layer transformer with a char-level wordpiece vocabulary plus a
    dense projection to 768 dimensions; weights are seeded so the saved
    model is identical across test sessions.
    """
    from sentence_transformers import SentenceTransformer
    from sentence_transformers.sentence_transformer.modules import Dense, Pooling, Transformer

    base = tmp_path_factory.mktemp("tiny-encoder")
    bert_dir = str(base / "tiny-bert")
    os.makedirs(bert_dir)
    vocab = (
        ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
        + list("abcdefghijklmnopqrstuvwxyz0123456789<>:-")
        + ["##" + c for c in "abcdefghijklmnopqrstuvwxyz0123456789"]
    )
    with open(os.path.join(bert_dir, "vocab.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(vocab) + "\n")

    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(vocab), hidden_size=32, num_hidden_layers=1,
        num_attention_heads=2, intermediate_size=64, max_position_embeddings=128,
    )
    BertModel(config).save_pretrained(bert_dir)
    BertTokenizerFast(
        vocab_file=os.path.join(bert_dir, "vocab.txt"), do_lower_case=True
    ).save_pretrained(bert_dir)

    word = Transformer(bert_dir, max_seq_length=128)
    pooling = Pooling(32, pooling_mode="mean")
    dense = Dense(in_features=32, out_features=768, activation_function=torch.nn.Tanh())
    model = SentenceTransformer(modules=[word, pooling, dense])
    out_dir = str(base / "tiny-st")
    model.save(out_dir)
    return out_dir


@pytest.fixture
def ldp_file(tmp_path):
    ldps = [
        "h:<-nsubj>:joined:<dobj>:t",
        "h:<-nsubj>:left:<dobj>:t",
        "h:<-poss>:t",
        "h:<-nsubj>:president:<prep>:of:<pobj>:t",
        "h:<-dobj>:released:<nsubj>:t",
        "h:<-nn>:film:<nsubj>:t",
        "h:<-amod>:state:<prep>:of:<pobj>:t",
        "h:<vmod>:produced:<prep>:by:<pobj>:t",
        "h:<-appos>:usa:<-appos>:t",
        "h:<rcmod>:plays:<dobj>:t",
    ]
    path = tmp_path / "ldps.txt"
    path.write_text("".join(l + "\n" for l in ldps), encoding="utf-8")
    return str(path), ldps
