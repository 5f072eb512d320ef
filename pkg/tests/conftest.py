import pytest

from wfc.workflow import parse_workflow

# mirrors the structure of a typical hello-world workflow: one job, four steps
HELLO_WORLD_YAML = """\
name: hello-world
on: push
jobs:
  build:
    runs-on: ubuntu-latest
    container:
      image: gcc:latest
    steps:
      - uses: actions/checkout@v2
      - name: install
        run: |
          apt-get update
          apt-get install -y make
      - name: build
        run: gradle build --stacktrace
      - name: test
        run: make test
"""

# one job, five named steps; used for instance-generation tests
FIVE_STEP_YAML = """\
name: node-ci
on: push
jobs:
  build:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v2
      - name: Set up node
        uses: actions/setup-node@v3
      - name: Yarn install
        run: yarn install
      - name: Run tests
        run: yarn test
      - name: Build
        run: yarn build
"""

# carries one token of each abstractable category
ABSTRACTION_YAML = """\
name: wp-tests
on: push
jobs:
  test:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v2
      - name: Install WP tests
        run: bash bin/install-wp-test.sh wordpress_test root root 127.0.0.1 latest
      - name: Run tests
        run: ./vendor/bin/phpunit
"""

TWO_JOB_YAML = """\
name: two-jobs
on: [push, pull_request]
jobs:
  first:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v2
      - name: install
        run: make install
      - name: test
        run: make test
  second:
    runs-on: macos-latest
    steps:
      - uses: actions/checkout@v2
      - run: make docs
"""


@pytest.fixture
def hello_doc():
    return parse_workflow(HELLO_WORLD_YAML, "repo1", ".github/workflows/ci.yml")


@pytest.fixture
def five_step_doc():
    return parse_workflow(FIVE_STEP_YAML, "repo2", ".github/workflows/node.yml")


@pytest.fixture
def abstraction_doc():
    return parse_workflow(ABSTRACTION_YAML, "repo3", ".github/workflows/wp.yml")


@pytest.fixture
def two_job_doc():
    return parse_workflow(TWO_JOB_YAML, "repo4", ".github/workflows/two.yml")
