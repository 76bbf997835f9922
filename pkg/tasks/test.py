from invoke import task


@task(default=True)
def test(ctx):
    ctx.run("tox")


@task
def bench(ctx, corpus="corpus", budget=None):
    """Run the symmetry pipeline over every .deq file of ``corpus``."""
    command = "python3 -m symkit bench {0} --no-timing".format(corpus)
    if budget:
        command += " --budget {0}".format(budget)
    ctx.run(command)
