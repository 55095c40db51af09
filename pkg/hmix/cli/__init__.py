import typer

from .commands import check_cmd, manufacture_cmd, solve_cmd, suite_cmd

app = typer.Typer(
    name="hmix",
    help="Complex mixed Hessian Dirichlet problems: continuity-method solves and invariant checks.",
    no_args_is_help=True,
    add_completion=False,
)

app.command("solve")(solve_cmd.solve)
app.command("check")(check_cmd.check)
app.command("suite")(suite_cmd.suite)
app.command("manufacture")(manufacture_cmd.manufacture)
