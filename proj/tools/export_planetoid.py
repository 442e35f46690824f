#!/usr/bin/env python3
"""Dump a Planetoid pickle distribution to plain text.

The upstream citation benchmarks ship as Python pickles (scipy sparse
matrices, numpy one-hot labels, an adjacency dict). This script is the
mechanical unpickling half of the conversion: it writes each piece to a
line-oriented text file without reordering, padding, deduplication, or any
other interpretation. All assembly semantics live in `spade convert`,
which consumes the directory written here.

Usage:
    python3 tools/export_planetoid.py <planetoid_data_dir> <dataset_name> <out_dir>

e.g.
    python3 tools/export_planetoid.py planetoid-master/data citeseer data/planetoid/citeseer
"""

import os
import pickle
import sys

import numpy as np
import scipy.sparse as sp


def load_pickle(data_dir, name, part):
    path = os.path.join(data_dir, f"ind.{name}.{part}")
    with open(path, "rb") as f:
        return pickle.load(f, encoding="latin1")


def dump_sparse(mat, path):
    mat = sp.csr_matrix(mat)
    with open(path, "w", newline="\n") as f:
        f.write(f"{mat.shape[0]} {mat.shape[1]} {mat.nnz}\n")
        coo = mat.tocoo()
        for r, c, v in zip(coo.row, coo.col, coo.data):
            f.write(f"{r} {c} {v:.17g}\n")


def dump_dense_int(mat, path):
    mat = np.asarray(mat, dtype=np.int64)
    with open(path, "w", newline="\n") as f:
        f.write(f"{mat.shape[0]} {mat.shape[1]}\n")
        for row in mat:
            f.write(" ".join(str(int(v)) for v in row) + "\n")


def dump_graph(graph, path):
    entries = [(u, v) for u, nbrs in graph.items() for v in nbrs]
    with open(path, "w", newline="\n") as f:
        f.write(f"{len(graph)} {len(entries)}\n")
        for u, nbrs in sorted(graph.items()):
            for v in nbrs:
                f.write(f"{u} {v}\n")


def main():
    if len(sys.argv) != 4:
        sys.exit(__doc__)
    data_dir, name, out_dir = sys.argv[1:]
    os.makedirs(out_dir, exist_ok=True)

    dump_sparse(load_pickle(data_dir, name, "allx"), os.path.join(out_dir, "allx.txt"))
    dump_sparse(load_pickle(data_dir, name, "tx"), os.path.join(out_dir, "tx.txt"))
    dump_dense_int(load_pickle(data_dir, name, "y"), os.path.join(out_dir, "y.txt"))
    dump_dense_int(load_pickle(data_dir, name, "ally"), os.path.join(out_dir, "ally.txt"))
    dump_dense_int(load_pickle(data_dir, name, "ty"), os.path.join(out_dir, "ty.txt"))
    dump_graph(load_pickle(data_dir, name, "graph"), os.path.join(out_dir, "graph.txt"))

    with open(os.path.join(data_dir, f"ind.{name}.test.index")) as f:
        idx = [line.strip() for line in f if line.strip()]
    with open(os.path.join(out_dir, "test.index"), "w", newline="\n") as f:
        f.write("\n".join(idx) + "\n")

    print(f"wrote {out_dir}: allx/tx/y/ally/ty/graph/test.index for {name}")


if __name__ == "__main__":
    main()
