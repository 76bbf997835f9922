import json
import os.path

from symkit.expr import parse_document


TESTS_DIR = os.path.abspath(os.path.dirname(__file__))
CORPUS_DIR = os.path.join(os.path.dirname(TESTS_DIR), "corpus")


def fixture_path(filename):
    return os.path.join(TESTS_DIR, "fixtures", filename)


def corpus_path(*parts):
    return os.path.join(CORPUS_DIR, *parts)


def load_fixture(filename):
    with open(fixture_path(filename)) as fd:
        return fd.read()


def load_fixture_as_dict(filename):
    return json.loads(load_fixture(filename))


def load_corpus_document(*parts):
    with open(corpus_path(*parts)) as fd:
        return parse_document(fd.read())
