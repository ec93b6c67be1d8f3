// Microphone capture for the pangram task: raw PCM via the Web Audio API,
// encoded client-side to mono PCM16 WAV (MediaRecorder would only give us
// compressed webm/opus, which the service deliberately does not accept).

import { concatChunks, encodeWavPcm16 } from './wav';

export interface Recording {
  wav: ArrayBuffer;
  durationS: number;
}

export class MicRecorder {
  private chunks: Float32Array[] = [];
  private context: AudioContext | null = null;
  private stream: MediaStream | null = null;
  private processor: ScriptProcessorNode | null = null;

  /** Throws DOMException NotAllowedError when the user denies the mic. */
  async start(): Promise<void> {
    this.stream = await navigator.mediaDevices.getUserMedia({
      audio: { echoCancellation: true, noiseSuppression: true },
    });
    this.context = new AudioContext();
    const source = this.context.createMediaStreamSource(this.stream);
    this.processor = this.context.createScriptProcessor(4096, 1, 1);
    this.chunks = [];
    this.processor.onaudioprocess = (event) => {
      this.chunks.push(new Float32Array(event.inputBuffer.getChannelData(0)));
    };
    source.connect(this.processor);
    this.processor.connect(this.context.destination);
  }

  async stop(): Promise<Recording> {
    const rate = this.context?.sampleRate ?? 48000;
    this.processor?.disconnect();
    this.stream?.getTracks().forEach((track) => track.stop());
    await this.context?.close();
    const samples = concatChunks(this.chunks);
    this.chunks = [];
    this.context = null;
    this.stream = null;
    this.processor = null;
    return { wav: encodeWavPcm16(samples, rate), durationS: samples.length / rate };
  }
}
