from cli.cli import app


def main():
    """
    Well, here is where it all starts: every subcommand lives in ``cli/cli.py``.
    """
    app(prog_name="multiset-chain-rule")


if __name__ == "__main__":
    main()
