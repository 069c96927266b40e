from cli.management.base import ChamberKitCommand


class Command(ChamberKitCommand):
    help = 'Enumerate candidate destabilizing walls of a sheaf over a region of P(X)'

    def run_pipeline(self, service):
        return service.walls()
