"""Serve a session: WebSocket command/event channel plus HTTP asset fetch.

One bidirectional channel per client at /session speaking line-delimited
JSON commands (one per message); events fan out to every connected client.
Asset bytes are served as PNG at /assets/<hash>. Slow subscribers are
disconnected rather than allowed to block the fan-out.
"""

import json
import queue
import threading

from fastapi import FastAPI, Response, WebSocket, WebSocketDisconnect

from .pngio import encode_png
from .runtime import CanvasRuntime
from .session import Session

SUBSCRIBER_BUFFER = 1024
PUMP_INTERVAL_S = 0.025


def build_app(runtime: CanvasRuntime):
    from contextlib import asynccontextmanager

    stop = threading.Event()

    def pump_loop():
        while not stop.is_set():
            with runtime.lock:
                runtime.pump()
            stop.wait(PUMP_INTERVAL_S)

    @asynccontextmanager
    async def lifespan(_app):
        thread = threading.Thread(target=pump_loop, daemon=True)
        thread.start()
        try:
            yield
        finally:
            stop.set()

    app = FastAPI(title="gencanvas session", lifespan=lifespan)
    session = Session(runtime)

    @app.get("/assets/{asset_id}")
    def get_asset(asset_id: str):
        asset = runtime.doc.assets.get(asset_id)
        if asset is None:
            return Response(status_code=404)
        return Response(
            content=encode_png(asset.width, asset.height, asset.raster),
            media_type="image/png",
        )

    @app.get("/document")
    def get_document():
        with runtime.lock:
            return Response(
                content=json.dumps(runtime.doc.to_dict(), sort_keys=True),
                media_type="application/json",
            )

    @app.websocket("/session")
    async def session_channel(ws: WebSocket):
        import anyio

        token = runtime.config.auth_token
        if token and ws.query_params.get("token") != token:
            await ws.close(code=4401)
            return
        await ws.accept()

        outbox: queue.Queue = queue.Queue(maxsize=SUBSCRIBER_BUFFER)
        alive = True

        def on_event(event):
            nonlocal alive
            if not alive:
                return
            try:
                outbox.put_nowait(event.to_json_line())
            except queue.Full:
                alive = False  # slow subscriber: drop it, never block

        with runtime.lock:
            unsubscribe = runtime.subscribe(on_event)
            snapshot = json.dumps(
                {"kind": "docPatch", "payload": {"patch": _full_patch(runtime)},
                 "doc_revision": runtime.doc.revision, "request_id": None, "seq": -1},
                sort_keys=True,
            )
        await ws.send_text(snapshot)

        try:
            async with anyio.create_task_group() as tg:

                async def sender():
                    while alive:
                        try:
                            line = await anyio.to_thread.run_sync(
                                lambda: outbox.get(timeout=0.25)
                            )
                        except queue.Empty:
                            continue
                        try:
                            await ws.send_text(line)
                        except Exception:
                            break
                    tg.cancel_scope.cancel()

                async def receiver():
                    nonlocal alive
                    try:
                        while True:
                            raw = await ws.receive_text()
                            try:
                                message = json.loads(raw)
                            except json.JSONDecodeError:
                                message = {"cmd": None, "request_id": None}
                            # Already broadcast through the subscription.
                            await anyio.to_thread.run_sync(session.handle_command, message)
                    except WebSocketDisconnect:
                        pass
                    finally:
                        alive = False
                        tg.cancel_scope.cancel()

                tg.start_soon(sender)
                tg.start_soon(receiver)
        finally:
            alive = False
            with runtime.lock:
                unsubscribe()

    return app


def _full_patch(runtime: CanvasRuntime) -> dict:
    from .protocol import diff_documents, empty_state

    return diff_documents(empty_state(), runtime.doc.to_dict())


def serve(runtime: CanvasRuntime, host: str = "127.0.0.1", port: int = 8787):
    import uvicorn

    uvicorn.run(build_app(runtime), host=host, port=port, log_level="warning")
