/** Figure model: a list of vector primitives rendered to SVG text or to an
 * RGB raster (PNG).  Coordinates are logical pixels at 96 dpi; the style dpi
 * scales the raster and the SVG width/height attributes, never the layout.
 */

import { GLYPH_HEIGHT, GLYPH_WIDTH, glyphFor } from "./font";
import { encodePng } from "./png";

export type Color = string; // #rrggbb

export interface Line {
  kind: "line";
  x1: number; y1: number; x2: number; y2: number;
  color: Color; width: number;
}

export interface Polyline {
  kind: "polyline";
  points: Array<[number, number]>;
  color: Color; width: number;
}

export interface Rect {
  kind: "rect";
  x: number; y: number; w: number; h: number;
  fill: Color;
}

export interface Circle {
  kind: "circle";
  cx: number; cy: number; r: number;
  fill: Color;
}

export interface Text {
  kind: "text";
  x: number; y: number;       // y is the text baseline
  text: string;
  size: number;               // glyph height in logical px
  color: Color;
  anchor: "start" | "middle" | "end";
}

export type Primitive = Line | Polyline | Rect | Circle | Text;

export class Figure {
  readonly primitives: Primitive[] = [];

  constructor(readonly width: number, readonly height: number) {}

  line(x1: number, y1: number, x2: number, y2: number, color: Color, width = 1): void {
    this.primitives.push({ kind: "line", x1, y1, x2, y2, color, width });
  }

  polyline(points: Array<[number, number]>, color: Color, width = 1): void {
    this.primitives.push({ kind: "polyline", points, color, width });
  }

  rect(x: number, y: number, w: number, h: number, fill: Color): void {
    this.primitives.push({ kind: "rect", x, y, w, h, fill });
  }

  circle(cx: number, cy: number, r: number, fill: Color): void {
    this.primitives.push({ kind: "circle", cx, cy, r, fill });
  }

  text(x: number, y: number, text: string, size: number, color: Color,
       anchor: "start" | "middle" | "end" = "start"): void {
    this.primitives.push({ kind: "text", x, y, text, size, color, anchor });
  }

  toSvg(dpi: number): string {
    const scale = dpi / 96;
    const out: string[] = [];
    out.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width * scale}" ` +
      `height="${this.height * scale}" viewBox="0 0 ${this.width} ${this.height}">`,
    );
    out.push(`<rect x="0" y="0" width="${this.width}" height="${this.height}" fill="#ffffff"/>`);
    for (const p of this.primitives) {
      switch (p.kind) {
        case "line":
          out.push(
            `<line x1="${fmt(p.x1)}" y1="${fmt(p.y1)}" x2="${fmt(p.x2)}" y2="${fmt(p.y2)}" ` +
            `stroke="${p.color}" stroke-width="${p.width}"/>`,
          );
          break;
        case "polyline": {
          const pts = p.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
          out.push(
            `<polyline points="${pts}" fill="none" stroke="${p.color}" stroke-width="${p.width}"/>`,
          );
          break;
        }
        case "rect":
          out.push(
            `<rect x="${fmt(p.x)}" y="${fmt(p.y)}" width="${fmt(p.w)}" height="${fmt(p.h)}" ` +
            `fill="${p.fill}"/>`,
          );
          break;
        case "circle":
          out.push(`<circle cx="${fmt(p.cx)}" cy="${fmt(p.cy)}" r="${fmt(p.r)}" fill="${p.fill}"/>`);
          break;
        case "text":
          out.push(
            `<text x="${fmt(p.x)}" y="${fmt(p.y)}" font-family="monospace" ` +
            `font-size="${p.size}" fill="${p.color}" text-anchor="${anchorName(p.anchor)}">` +
            `${escapeXml(p.text)}</text>`,
          );
          break;
      }
    }
    out.push("</svg>");
    return out.join("\n") + "\n";
  }

  toPng(dpi: number): Buffer {
    const scale = dpi / 96;
    const raster = new Raster(Math.round(this.width * scale), Math.round(this.height * scale));
    raster.clear(255, 255, 255);
    for (const p of this.primitives) {
      switch (p.kind) {
        case "line":
          raster.line(p.x1 * scale, p.y1 * scale, p.x2 * scale, p.y2 * scale,
                      p.color, Math.max(1, Math.round(p.width * scale)));
          break;
        case "polyline":
          for (let i = 1; i < p.points.length; i++) {
            raster.line(p.points[i - 1][0] * scale, p.points[i - 1][1] * scale,
                        p.points[i][0] * scale, p.points[i][1] * scale,
                        p.color, Math.max(1, Math.round(p.width * scale)));
          }
          break;
        case "rect":
          raster.fillRect(p.x * scale, p.y * scale, p.w * scale, p.h * scale, p.fill);
          break;
        case "circle":
          raster.fillCircle(p.cx * scale, p.cy * scale, p.r * scale, p.fill);
          break;
        case "text":
          raster.text(p, scale);
          break;
      }
    }
    return encodePng(raster.width, raster.height, raster.pixels);
  }
}

function fmt(value: number): string {
  return Number(value.toFixed(3)).toString();
}

function anchorName(anchor: "start" | "middle" | "end"): string {
  return anchor;
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function parseColor(color: Color): [number, number, number] {
  const hex = color.replace("#", "");
  return [
    parseInt(hex.slice(0, 2), 16),
    parseInt(hex.slice(2, 4), 16),
    parseInt(hex.slice(4, 6), 16),
  ];
}

class Raster {
  readonly pixels: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.pixels = new Uint8Array(width * height * 3);
  }

  clear(r: number, g: number, b: number): void {
    for (let i = 0; i < this.pixels.length; i += 3) {
      this.pixels[i] = r;
      this.pixels[i + 1] = g;
      this.pixels[i + 2] = b;
    }
  }

  set(x: number, y: number, rgb: [number, number, number]): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const at = (yi * this.width + xi) * 3;
    this.pixels[at] = rgb[0];
    this.pixels[at + 1] = rgb[1];
    this.pixels[at + 2] = rgb[2];
  }

  line(x1: number, y1: number, x2: number, y2: number, color: Color, width: number): void {
    const rgb = parseColor(color);
    // Bresenham over the longer axis, thickness by perpendicular offsets
    const steps = Math.max(Math.abs(x2 - x1), Math.abs(y2 - y1), 1);
    const half = (width - 1) / 2;
    for (let s = 0; s <= steps; s++) {
      const t = s / steps;
      const x = x1 + (x2 - x1) * t;
      const y = y1 + (y2 - y1) * t;
      for (let ox = -half; ox <= half; ox++) {
        for (let oy = -half; oy <= half; oy++) {
          this.set(x + ox, y + oy, rgb);
        }
      }
    }
  }

  fillRect(x: number, y: number, w: number, h: number, fill: Color): void {
    const rgb = parseColor(fill);
    for (let yy = Math.round(y); yy < Math.round(y + h); yy++) {
      for (let xx = Math.round(x); xx < Math.round(x + w); xx++) {
        this.set(xx, yy, rgb);
      }
    }
  }

  fillCircle(cx: number, cy: number, r: number, fill: Color): void {
    const rgb = parseColor(fill);
    for (let yy = Math.floor(cy - r); yy <= Math.ceil(cy + r); yy++) {
      for (let xx = Math.floor(cx - r); xx <= Math.ceil(cx + r); xx++) {
        if ((xx - cx) ** 2 + (yy - cy) ** 2 <= r * r) {
          this.set(xx, yy, rgb);
        }
      }
    }
  }

  text(t: Text, scale: number): void {
    const rgb = parseColor(t.color);
    const pixel = Math.max(1, Math.round((t.size * scale) / GLYPH_HEIGHT));
    const advance = (GLYPH_WIDTH + 1) * pixel;
    const width = t.text.length * advance;
    let x0 = t.x * scale;
    if (t.anchor === "middle") x0 -= width / 2;
    if (t.anchor === "end") x0 -= width;
    const y0 = t.y * scale - GLYPH_HEIGHT * pixel; // baseline to glyph top
    for (let n = 0; n < t.text.length; n++) {
      const rows = glyphFor(t.text[n]);
      for (let gy = 0; gy < GLYPH_HEIGHT; gy++) {
        for (let gx = 0; gx < GLYPH_WIDTH; gx++) {
          if ((rows[gy] >> (GLYPH_WIDTH - 1 - gx)) & 1) {
            for (let py = 0; py < pixel; py++) {
              for (let px = 0; px < pixel; px++) {
                this.set(x0 + n * advance + gx * pixel + px, y0 + gy * pixel + py, rgb);
              }
            }
          }
        }
      }
    }
  }
}

/** Linear axis mapping with round tick positions. */
export class Scale {
  constructor(
    readonly lo: number, readonly hi: number,
    readonly pxLo: number, readonly pxHi: number,
  ) {}

  at(value: number): number {
    const span = this.hi - this.lo || 1;
    return this.pxLo + ((value - this.lo) / span) * (this.pxHi - this.pxLo);
  }

  ticks(count = 5): number[] {
    const span = this.hi - this.lo || 1;
    const step = niceStep(span / count);
    const first = Math.ceil(this.lo / step) * step;
    const out: number[] = [];
    for (let v = first; v <= this.hi + 1e-12 * Math.abs(span); v += step) {
      out.push(Number(v.toPrecision(12)));
    }
    return out;
  }
}

function niceStep(raw: number): number {
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  const base = raw / power;
  const nice = base < 1.5 ? 1 : base < 3.5 ? 2 : base < 7.5 ? 5 : 10;
  return nice * power;
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(1).replace("e", "E");
  }
  return Number(value.toPrecision(6)).toString();
}
