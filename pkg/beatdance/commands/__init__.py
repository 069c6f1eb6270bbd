import typer

from . import (
    data_commands,
    train_commands,
    generate_commands,
    evaluate_commands,
)

router = typer.Typer()
for module in (data_commands, train_commands, generate_commands, evaluate_commands):
    router.registered_commands.extend(module.router.registered_commands)
