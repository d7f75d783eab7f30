from toroidal.main import app

app(prog_name="toroidal")
