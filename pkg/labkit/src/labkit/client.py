"""Thin HTTP wrapper over the platform API. The board never computes values
the server already exposes; this client just fetches them."""

from __future__ import annotations

import httpx


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        super().__init__(f"{status} {code}: {message}")


class ApiClient:
    def __init__(self, endpoint: str, timeout: float = 5.0):
        self.base = endpoint.rstrip("/")
        self._http = httpx.Client(timeout=timeout)

    def close(self) -> None:
        self._http.close()

    def _get(self, path: str, **params) -> dict:
        resp = self._http.get(f"{self.base}/api/v1{path}", params=params or None)
        if resp.status_code >= 400:
            try:
                err = resp.json()["error"]
            except Exception:
                err = {"code": "http_error", "message": resp.text}
            raise ApiError(resp.status_code, err["code"], err["message"])
        return resp.json()

    def buildings(self) -> list[dict]:
        return self._get("/buildings")["buildings"]

    def summary(self, building_id: str) -> dict:
        return self._get(f"/buildings/{building_id}/summary")

    def daily_energy(self, building_id: str, date: str) -> dict:
        return self._get(f"/buildings/{building_id}/energy/daily", date=date)
